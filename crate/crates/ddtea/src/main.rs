fn main() -> std::process::ExitCode {
    ddtea::cli::main()
}
