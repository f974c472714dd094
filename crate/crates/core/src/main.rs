fn main() {
    std::process::exit(latcrit::cli::main_with_args(std::env::args_os()));
}
