fn main() {
    std::process::exit(ptcmm::cli::main());
}
