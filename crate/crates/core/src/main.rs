fn main() {
    std::process::exit(nde_lab::cli::main_with_args(std::env::args_os()));
}
