fn main() -> std::process::ExitCode {
    mpesg::cli::main()
}
