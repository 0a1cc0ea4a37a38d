fn main() {
    std::process::exit(comsense::cli::main());
}
