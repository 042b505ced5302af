fn main() -> std::process::ExitCode {
    steinhaus::cli::main()
}
