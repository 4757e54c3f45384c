fn main() {
    std::process::exit(roundsphere::main_with_args(std::env::args_os()));
}
