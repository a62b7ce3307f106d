// LAPACK comes from a system library; OpenBLAS by default.
fn main() {
    println!("cargo:rerun-if-env-changed=NEPV_LAPACK_LIB");
    let lib = std::env::var("NEPV_LAPACK_LIB").unwrap_or_else(|_| "openblas".to_string());
    println!("cargo:rustc-link-lib={lib}");
}
