fn main() {
    std::process::exit(beurling::cli::main_with(std::env::args_os()));
}
