fn main() {
    std::process::exit(coulomb_linstat::cli::main(std::env::args_os()));
}
