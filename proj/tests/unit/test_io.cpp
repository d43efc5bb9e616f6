#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "amput/error.hpp"
#include "amput/io.hpp"
#include "curves.hpp"

using namespace amput;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "amput_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

}  // namespace

TEST(BoundaryCsv, RoundTripIsExact) {
    const auto run = amput::testing::solve_on(CanonicalParams{0.3, 0.8, {}}, 1.0, 1e-2, 2e-3);
    const fs::path path = scratch("round_trip.csv");
    write_boundary_csv(path, run.curve);
    EXPECT_EQ(first_line(path), "t,phi,varphi,dphi");
    const BoundaryCurve back = read_boundary_csv(path, run.curve.params);
    ASSERT_EQ(back.size(), run.curve.size());
    EXPECT_EQ(back.mu, run.curve.mu);
    EXPECT_EQ(back.t, run.curve.t);
    EXPECT_EQ(back.phi, run.curve.phi);
    EXPECT_EQ(back.varphi, run.curve.varphi);
    EXPECT_EQ(back.dphi, run.curve.dphi);
}

TEST(BoundaryCsv, MissingFileIsIoError) {
    try {
        (void)read_boundary_csv(scratch("does_not_exist.csv"), CanonicalParams{});
        FAIL() << "expected io_error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::io_error);
    }
}

TEST(BoundaryCsv, RejectsForeignHeader) {
    const fs::path path = scratch("foreign.csv");
    write_text(path, "a,b\n1,2\n");
    EXPECT_THROW((void)read_boundary_csv(path, CanonicalParams{}), Error);
}

TEST(Tables, Headers) {
    const MarketParams m{0.05, 0.3};
    const LatticeBoundary lb = extract_lattice_boundary({200, 1.0, m});
    write_lattice_csv(scratch("lattice.csv"), lb, m);
    EXPECT_EQ(first_line(scratch("lattice.csv")), "t,s_star,x_canonical");

    BalayageResidual r;
    r.s = {4.0, 2.0};
    write_residual_table(scratch("res.csv"), {r});
    EXPECT_EQ(first_line(scratch("res.csv")), "re_s,im_s,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,rel_err,tail_estimate");
}

TEST(Report, FlatKeys) {
    const json j = to_json(AsymptoticReport{});
    for (const char* key : {"mu", "eta", "moment_v1", "B1", "lambda0", "beta1", "beta1_intro", "beta1_parts",
                            "tail_fit", "consistency"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j.size(), 10u);
}

TEST(Format, SeventeenDigits) {
    EXPECT_EQ(fmt_double(0.1), "0.10000000000000001");
    EXPECT_EQ(std::stod(fmt_double(1.0 / 3.0)), 1.0 / 3.0);
}
