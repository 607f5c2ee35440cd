fn main() {
    let code = cuebounds::cli::run(std::env::args_os());
    std::process::exit(code);
}
