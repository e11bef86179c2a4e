fn main() {
    let code = rmlab::cli::run(std::env::args_os());
    std::process::exit(code);
}
