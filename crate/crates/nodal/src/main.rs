fn main() {
    std::process::exit(nodal::cli::main_with(std::env::args_os()));
}
