fn main() {
    std::process::exit(ragnet::cli::main());
}
