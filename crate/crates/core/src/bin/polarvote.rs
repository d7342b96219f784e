fn main() -> std::process::ExitCode {
    polarvote::cli::main()
}
