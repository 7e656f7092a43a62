fn main() -> std::process::ExitCode {
    emlangevin::cli::main()
}
