use std::path::PathBuf;

fn main() {
    let dir = PathBuf::from(std::env::var("CARGO_MANIFEST_DIR").unwrap());
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    let config = cbindgen::Config::from_file(dir.join("cbindgen.toml")).expect("reading cbindgen.toml");
    match cbindgen::generate_with_config(&dir, config) {
        Ok(b) => {
            std::fs::create_dir_all(dir.join("include")).expect("creating include/");
            b.write_to_file(dir.join("include/quadcover.h"));
        }
        Err(e) => println!("cargo:warning=header not regenerated: {e}"),
    }
}
