fn main() {
    std::process::exit(trapstab_cli::run::main_impl());
}
