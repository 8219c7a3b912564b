#include <polyhom/cli.hpp>

int main(int argc, char** argv) {
    return polyhom::cli::run(argc, argv);
}
