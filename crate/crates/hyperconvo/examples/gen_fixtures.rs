//! Regenerates the semigroup-table fixtures under fixtures/ from the named
//! builders. The deformation-spec fixtures are maintained by hand; a test
//! in the acceptance suite keeps the generated tables in sync.
//!
//! Usage: cargo run -p hyperconvo --example gen_fixtures

use std::fs;
use std::path::Path;

use hyperconvo::io::semigroup_to_json;
use hyperconvo::semigroup::build_named_example;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    fs::create_dir_all(&dir).expect("fixtures directory");
    let tables = [
        ("zmax4.json", "zmax", &[4usize][..]),
        ("ex22.json", "ex2.2", &[8]),
        ("ex23.json", "ex2.3", &[3]),
        ("maxsum.json", "maxsum", &[4, 6]),
    ];
    for (file, name, params) in tables {
        let table = build_named_example(name, params).expect(name);
        let path = dir.join(file);
        fs::write(&path, semigroup_to_json(&table)).expect("write fixture");
        println!("wrote {}", path.display());
    }
}
