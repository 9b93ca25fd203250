fn main() {
    std::process::exit(phonostream::cli::main_with_args(std::env::args_os()));
}
