// Writes the scripted scenarios as CVML files for the command-line tests.
#include "support/corpus.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_corpus <dir>\n";
        return 2;
    }
    const std::string dir = argv[1];
    std::filesystem::create_directories(dir);
    std::ofstream(dir + "/drop.xml") << corpus::to_xml(corpus::drop_scenario(), "Drop");
    std::ofstream(dir + "/loiter.xml") << corpus::to_xml(corpus::loiter_scenario(), "Loiter");
    return 0;
}
