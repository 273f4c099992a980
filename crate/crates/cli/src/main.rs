fn main() {
    std::process::exit(frametensor::run(std::env::args_os()));
}
