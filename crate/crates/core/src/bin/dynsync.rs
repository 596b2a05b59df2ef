fn main() {
    std::process::exit(dynsync::cli::main_with_args(std::env::args_os()));
}
