fn main() -> std::process::ExitCode {
    cocyc::cli::main()
}
