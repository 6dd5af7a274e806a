fn main() {
    std::process::exit(bless::cli::main_with_args(std::env::args_os()));
}
