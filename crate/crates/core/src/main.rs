fn main() {
    let (out, code) = sie_core::cli::run(std::env::args_os());
    print!("{out}");
    std::process::exit(code);
}
