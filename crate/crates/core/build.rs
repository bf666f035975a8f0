fn main() {
    // any LAPACK provider works (reference, OpenBLAS, MKL via alternatives)
    println!("cargo:rustc-link-lib=dylib=lapack");
}
