fn main() {
    std::process::exit(wqa::cli::main_with_args(std::env::args_os()));
}
