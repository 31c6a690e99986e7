fn main() {
    std::process::exit(tugwar::cli::main_with(std::env::args_os()));
}
