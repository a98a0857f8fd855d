#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "sphcov/dataset.hpp"

using namespace sphcov;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path path = fs::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("loads a toy file") {
  const auto path = write_temp("sphcov_toy.csv",
                               "lon,lat,time,var,value\n"
                               "10,20,0,1,1.5\n"
                               "10,20,0,2,-0.5\n"
                               "30,-40,1,1,0.25\n"
                               "30,-40,1,2,0.75\n");
  const Dataset data = Dataset::load_csv(path);
  CHECK(data.size() == 4);
  CHECK(data.num_variables() == 2);
  CHECK(data.row(0).variable == 0);
  CHECK(data.row(1).variable == 1);
  CHECK(data.row(0).value == 1.5);
  CHECK_FALSE(data.demeaned());
}

TEST_CASE("comment lines and trailing newline are tolerated") {
  const auto path = write_temp("sphcov_comments.csv",
                               "# sphcov 0.1.0\n"
                               "# subcommand=simulate\n"
                               "lon,lat,time,var,value\n"
                               "0,0,0,1,1\n"
                               "1,0,0,1,2\n");
  CHECK(Dataset::load_csv(path).size() == 2);
}

TEST_CASE("bad rows are rejected with line numbers") {
  const auto bad_lat = write_temp("sphcov_badlat.csv",
                                  "lon,lat,time,var,value\n"
                                  "0,0,0,1,1\n"
                                  "0,95,0,1,2\n");
  CHECK_THROWS_WITH_AS(Dataset::load_csv(bad_lat), doctest::Contains("line 3"),
                       std::runtime_error);

  const auto bad_field = write_temp("sphcov_badfield.csv",
                                    "lon,lat,time,var,value\n"
                                    "0,0,0,1,abc\n");
  CHECK_THROWS_WITH_AS(Dataset::load_csv(bad_field), doctest::Contains("line 2"),
                       std::runtime_error);

  const auto bad_header = write_temp("sphcov_badheader.csv",
                                     "lon,lat,t,var,value\n0,0,0,1,1\n");
  CHECK_THROWS_AS(Dataset::load_csv(bad_header), std::runtime_error);

  const auto missing_field = write_temp("sphcov_missing.csv",
                                        "lon,lat,time,var,value\n0,0,0,1\n");
  CHECK_THROWS_WITH_AS(Dataset::load_csv(missing_field),
                       doctest::Contains("expected 5 fields"),
                       std::runtime_error);
}

TEST_CASE("duplicate keys are rejected with the key") {
  const auto dup = write_temp("sphcov_dup.csv",
                              "lon,lat,time,var,value\n"
                              "10,20,0,1,1\n"
                              "10,20,0,1,2\n");
  CHECK_THROWS_WITH_AS(Dataset::load_csv(dup), doctest::Contains("duplicate key"),
                       std::invalid_argument);
}

TEST_CASE("paper-shaped file round trips") {
  std::string content = "lon,lat,time,var,value\n";
  char buf[128];
  for (int s = 0; s < 200; ++s) {
    for (int t = 0; t < 10; ++t) {
      for (int v = 1; v <= 2; ++v) {
        std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%d,%d,%.10g\n",
                      50.0 + 0.5 * s, -50.0 + 0.2 * s, t, v,
                      0.1 * s + 0.01 * t + v);
        content += buf;
      }
    }
  }
  const auto path = write_temp("sphcov_paper.csv", content);
  const Dataset data = Dataset::load_csv(path);
  CHECK(data.size() == 4000);
  CHECK(data.num_variables() == 2);

  const auto out = fs::temp_directory_path() / "sphcov_paper_out.csv";
  data.save_csv(out, {"written by the round-trip test"});
  const Dataset back = Dataset::load_csv(out);
  CHECK(back.size() == data.size());
  for (std::size_t k = 0; k < data.size(); ++k) {
    CHECK(back.row(k).value == data.row(k).value);
    CHECK(back.row(k).time == data.row(k).time);
    CHECK(back.row(k).variable == data.row(k).variable);
  }
}

TEST_CASE("demean removes and records per-variable means") {
  const auto path = write_temp("sphcov_demean.csv",
                               "lon,lat,time,var,value\n"
                               "0,0,0,1,2\n"
                               "1,0,0,1,4\n"
                               "0,0,0,2,10\n"
                               "1,0,0,2,30\n");
  DatasetOptions options;
  options.demean = true;
  const Dataset data = Dataset::load_csv(path, options);
  CHECK(data.demeaned());
  CHECK(data.removed_means()[0] == doctest::Approx(3.0));
  CHECK(data.removed_means()[1] == doctest::Approx(20.0));
  CHECK(data.row(0).value == doctest::Approx(-1.0));
  CHECK(data.row(2).value == doctest::Approx(-10.0));
}

TEST_CASE("empirical statistics") {
  std::vector<Observation> rows;
  // two sites, two times, two variables with a known collocated pattern
  const double vals1[4] = {1.0, -1.0, 2.0, -2.0};
  int k = 0;
  for (int s = 0; s < 2; ++s) {
    for (int t = 0; t < 2; ++t) {
      rows.push_back({SpherePoint(10.0 * s, 0.0), double(t), 0, vals1[k]});
      rows.push_back({SpherePoint(10.0 * s, 0.0), double(t), 1, 2.0 * vals1[k]});
      ++k;
    }
  }
  const Dataset data(rows);
  CHECK(data.empirical_cross_correlation(0, 1) == doctest::Approx(1.0));
  const auto var = data.empirical_variances();
  CHECK(var[1] == doctest::Approx(4.0 * var[0]));
}

}  // TEST_SUITE
