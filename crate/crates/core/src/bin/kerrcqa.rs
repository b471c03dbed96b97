fn main() {
    std::process::exit(kerrcqa::cli::run(std::env::args_os()));
}
