#include "trendvote/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return trendvote::cli::run(argc, argv, std::cout, std::cerr);
}
