fn main() {
    std::process::exit(stokes_stab::cli::main_with_args(std::env::args_os()));
}
