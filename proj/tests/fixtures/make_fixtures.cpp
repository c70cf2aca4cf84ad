// Regenerates the CSV fixtures used by the CLI tests:
//   make_fixtures <output dir>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "hdtest/hdtest.hpp"

namespace {

void write(const std::filesystem::path& path, const hdtest::Sample& s) {
    std::ofstream out(path);
    hdtest::csv::write(out, s, 10);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_fixtures <dir>\n";
        return 1;
    }
    const std::filesystem::path dir = argv[1];
    using hdtest::DistSpec;
    using hdtest::CovSpec;

    DistSpec identity;
    identity.cov = CovSpec::identity();
    write(dir / "identity_g1.csv", hdtest::draw_sample(identity, 300, 40, 101));
    write(dir / "identity_g2.csv", hdtest::draw_sample(identity, 300, 40, 102));

    DistSpec spiked1;
    spiked1.cov = CovSpec::spiked({0.8, 0.7}, 0.3, 1.0);
    DistSpec spiked2 = spiked1;
    spiked2.cov.multiplier = 1.5;
    write(dir / "spiked_g1.csv", hdtest::draw_sample(spiked1, 256, 48, 201));
    write(dir / "spiked_g2.csv", hdtest::draw_sample(spiked2, 256, 64, 202));

    hdtest::Matrix same(3, 4);
    same.colwise() = hdtest::Vector::LinSpaced(3, 1.0, 3.0);
    write(dir / "identical_a.csv", hdtest::Sample(same));
    write(dir / "identical_b.csv", hdtest::Sample(same));

    write(dir / "wide4.csv", hdtest::draw_sample(identity, 4, 8, 301));
    write(dir / "narrow3.csv", hdtest::draw_sample(identity, 3, 8, 302));
    write(dir / "n5.csv", hdtest::draw_sample(identity, 20, 5, 303));
    return 0;
}
