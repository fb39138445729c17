#include "dephase/cli.hpp"

int main(int argc, char** argv)
{
    return dephase::cli::run_cli(argc, argv);
}
