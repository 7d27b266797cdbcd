#include "cli_app.hpp"

int main(int argc, char** argv) { return ctc::cli::run(argc, argv); }
