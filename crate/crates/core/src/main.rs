fn main() -> std::process::ExitCode {
    nbbd::cli::main()
}
