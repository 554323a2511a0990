fn main() -> std::process::ExitCode {
    scramble::cli::main()
}
