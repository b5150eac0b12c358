fn main() {
    std::process::exit(ccenum::cli::main());
}
