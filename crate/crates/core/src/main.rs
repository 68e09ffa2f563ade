fn main() {
    std::process::exit(scrkernel::cli::run(std::env::args_os()));
}
