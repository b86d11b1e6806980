fn main() {
    std::process::exit(linre::cli::main());
}
