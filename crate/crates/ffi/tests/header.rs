use std::path::Path;
use std::process::Command;

fn compile(compiler: &str, extra: &[&str]) {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let status = match Command::new(compiler)
        .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
        .arg(dir.join("include"))
        .args(extra)
        .arg(dir.join("tests/c/smoke.c"))
        .status()
    {
        Ok(s) => s,
        Err(_) => {
            eprintln!("{compiler} not available, skipping");
            return;
        }
    };
    assert!(status.success(), "{compiler} rejected the header");
}

#[test]
fn header_compiles_as_c() {
    compile("cc", &["-std=c11"]);
}

#[test]
fn header_compiles_as_cpp() {
    compile("c++", &["-x", "c++", "-std=c++17"]);
}
