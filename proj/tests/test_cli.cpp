#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "leafid/imaging.hpp"
#include "leafid/io.hpp"
#include "support/synthetic.hpp"

namespace fs = std::filesystem;
using namespace leafid;

namespace {

std::string binary() {
    const char* bin = std::getenv("LEAFID_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "LEAFID_BIN must point at the leafid executable");
    return bin;
}

int run_cli(const std::string& args, const std::string& log = "cli_out.txt") {
    const std::string cmd = binary() + " " + args + " >" + log + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* kDataDir = "cli_test_data";

void ensure_dataset() {
    if (fs::is_directory(kDataDir)) return;
    using synth::LeafShape;
    std::vector<synth::ClassSpec> classes(3);
    classes[0] = {"alder", {LeafShape::Ellipse, {70, 135, 60}, 0.2, 0.2, true}};
    classes[1] = {"birch", {LeafShape::Rhombus, {150, 95, 85}, 0.2, 0.2, true}};
    classes[2] = {"cedar", {LeafShape::Rectangle, {90, 110, 160}, 0.4, 0.2, true}};
    for (std::size_t ci = 0; ci < classes.size(); ++ci) {
        const fs::path dir = fs::path(kDataDir) / classes[ci].label;
        fs::create_directories(dir);
        for (int i = 0; i < 8; ++i) {
            char name[16];
            std::snprintf(name, sizeof name, "%03d.png", i);
            write_rgb_png(synth::render_leaf(classes[ci].style, 4242 + 100 * ci + i, 96),
                          (dir / name).string());
        }
    }
}

}  // namespace

TEST_CASE("usage errors exit with status 2, help with 0") {
    CHECK(run_cli("") == 2);
    CHECK(run_cli("no-such-command") == 2);
    CHECK(run_cli("evaluate") == 2);  // missing required flags
    CHECK(run_cli("--help") == 0);
}

TEST_CASE("segment writes a readable 1-bit mask PNG") {
    ensure_dataset();
    const std::string image = (fs::path(kDataDir) / "alder" / "000.png").string();
    CHECK(run_cli("segment --image " + image + " --out cli_mask.png") == 0);
    REQUIRE(fs::exists("cli_mask.png"));

    // PNG signature + 1-bit grayscale IHDR (depth byte at offset 24, color at 25)
    const std::string bytes = read_file("cli_mask.png");
    REQUIRE(bytes.size() > 26);
    CHECK(static_cast<unsigned char>(bytes[0]) == 0x89);
    CHECK(bytes.substr(1, 3) == "PNG");
    CHECK(bytes[24] == 1);
    CHECK(bytes[25] == 0);

    // the decoded mask matches the in-process segmentation
    const RgbImage decoded = read_rgb("cli_mask.png");
    const LeafMask expected = segment_leaf(load_leaf_image(image).gray);
    REQUIRE(decoded.width() == expected.width());
    std::size_t white = 0;
    for (int y = 0; y < decoded.height(); ++y)
        for (int x = 0; x < decoded.width(); ++x) {
            const bool on = decoded.at(x, y).r > 127;
            CHECK(on == expected.at(x, y));
            if (on) ++white;
        }
    CHECK(white == expected.count());
}

TEST_CASE("module errors exit with status 1 and name the error") {
    ensure_dataset();
    std::ofstream("cli_flat.png");  // zero-byte file decodes as nothing
    CHECK(run_cli("segment --image cli_flat.png --out x.png", "cli_err.txt") == 1);
    CHECK(read_file("cli_err.txt").find("DecodeError") != std::string::npos);

    CHECK(run_cli("evaluate --data " + std::string(kDataDir) +
                      " --train 40 --test 10 --out cli_r.csv",
                  "cli_err2.txt") == 1);
    CHECK(read_file("cli_err2.txt").find("InsufficientImages") != std::string::npos);
}

TEST_CASE("evaluate emits the report CSV and is byte-stable across runs") {
    ensure_dataset();
    const std::string args = "evaluate --data " + std::string(kDataDir) +
                             " --config best-flavia --train 5 --test 2 --sigma 0.05 --seed 1";
    CHECK(run_cli(args + " --out cli_report1.csv") == 0);
    CHECK(run_cli(args + " --out cli_report2.csv") == 0);

    const std::string csv = read_file("cli_report1.csv");
    CHECK(csv == read_file("cli_report2.csv"));
    CHECK(csv.rfind("config,class,n_test,n_correct,accuracy\n", 0) == 0);
    CHECK(csv.find("alder") != std::string::npos);
    CHECK(csv.find("summary") != std::string::npos);
    // header + 3 class rows + summary
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    // default cache location is the dataset root
    CHECK(fs::exists(fs::path(kDataDir) / "leafid_features.csv"));
}

TEST_CASE("train then classify round trip") {
    ensure_dataset();
    CHECK(run_cli("train --data " + std::string(kDataDir) +
                  " --config pft+geom+mean --train 5 --test 2 --seed 3 --out cli_model.json") == 0);
    REQUIRE(fs::exists("cli_model.json"));

    const std::string image = (fs::path(kDataDir) / "birch" / "001.png").string();
    CHECK(run_cli("classify --model cli_model.json --image " + image, "cli_pred.txt") == 0);
    const std::string out = read_file("cli_pred.txt");
    CHECK(out.find("prediction: birch") != std::string::npos);
}

TEST_CASE("ablation, sigma-sweep, and learning-curve emit their CSVs") {
    ensure_dataset();
    const std::string data = kDataDir;

    CHECK(run_cli("ablation --data " + data +
                  " --configs pft,pft+geom,best-flavia --train 5 --test 2 --seed 1"
                  " --out cli_ablation.csv") == 0);
    const std::string ab = read_file("cli_ablation.csv");
    CHECK(ab.rfind("config,n_test,n_correct,accuracy\n", 0) == 0);
    CHECK(std::count(ab.begin(), ab.end(), '\n') == 4);

    CHECK(run_cli("sigma-sweep --data " + data +
                  " --config pft+geom+mean --sigmas 0.02,0.05 --train 5 --test 2 --seed 1"
                  " --out cli_sweep.csv") == 0);
    const std::string sw = read_file("cli_sweep.csv");
    CHECK(sw.rfind("sigma,accuracy\n", 0) == 0);
    CHECK(std::count(sw.begin(), sw.end(), '\n') == 3);

    CHECK(run_cli("learning-curve --data " + data +
                  " --config pft+geom+mean --sizes 2,5 --test 2 --repeats 2 --seed 1"
                  " --out cli_curve.csv") == 0);
    const std::string cv = read_file("cli_curve.csv");
    CHECK(cv.rfind("train_size,mean_accuracy\n", 0) == 0);
    CHECK(std::count(cv.begin(), cv.end(), '\n') == 3);
}

TEST_CASE("extract writes one row per image") {
    ensure_dataset();
    CHECK(run_cli("extract --data " + std::string(kDataDir) +
                  " --config pft+geom --out cli_features.csv") == 0);
    const std::string csv = read_file("cli_features.csv");
    CHECK(csv.rfind("path,label,values\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 24);
}

TEST_CASE("LEAFID_CACHE_DIR moves the feature cache") {
    ensure_dataset();
    fs::create_directories("cli_cache_home");
    const std::string cmd = "LEAFID_CACHE_DIR=cli_cache_home " + binary() + " extract --data " +
                            kDataDir + " --config geom --out cli_f2.csv >/dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(fs::path("cli_cache_home") / "leafid_features.csv"));
}

TEST_CASE("segment --tophat writes the four top-hat rasters") {
    ensure_dataset();
    const std::string image = (fs::path(kDataDir) / "cedar" / "002.png").string();
    CHECK(run_cli("segment --image " + image + " --out cli_m2.png --tophat cli_tophat") == 0);
    for (int r = 1; r <= 4; ++r)
        CHECK(fs::exists("cli_tophat_r" + std::to_string(r) + ".png"));
}

TEST_CASE("a manifest CSV substitutes for the directory layout") {
    ensure_dataset();
    std::ofstream manifest("cli_manifest.csv");
    manifest << "path,label,split\n";
    for (const char* cls : {"alder", "birch", "cedar"})
        for (int i = 0; i < 8; ++i) {
            char name[16];
            std::snprintf(name, sizeof name, "%03d.png", i);
            // relabel on purpose: the manifest, not the directory, decides
            manifest << (fs::path(kDataDir) / cls / name).string() << ",grp_" << cls
                     << ",unassigned\n";
        }
    manifest.close();

    CHECK(run_cli("evaluate --data cli_manifest.csv --config pft+geom+mean --train 5 --test 2"
                  " --seed 1 --out cli_manifest_report.csv") == 0);
    const std::string csv = read_file("cli_manifest_report.csv");
    CHECK(csv.find("grp_alder") != std::string::npos);
    CHECK(csv.find("summary") != std::string::npos);
}

TEST_CASE("the table2 preset expands to the twelve feature rows") {
    ensure_dataset();
    CHECK(run_cli("ablation --data " + std::string(kDataDir) +
                  " --configs table2 --train 5 --test 2 --seed 1 --out cli_table2.csv") == 0);
    const std::string csv = read_file("cli_table2.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);  // header + 12 rows
    CHECK(csv.find("\npft,") != std::string::npos);
    CHECK(csv.find("\npft+geom+mean+std+skew+kurt+glcm,") != std::string::npos);
    CHECK(csv.find("\npft+geom+mean+std+skew+vein4,") != std::string::npos);
}
