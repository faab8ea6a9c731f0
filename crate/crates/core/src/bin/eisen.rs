fn main() {
    std::process::exit(eisen::cli::main_entry(std::env::args_os()));
}
