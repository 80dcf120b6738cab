#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#ifndef TNSVD_CLI
#error "TNSVD_CLI must name the command-line binary"
#endif

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

const fs::path& workdir() {
    static const fs::path d = [] {
        auto p = fs::temp_directory_path() / ("tnsvd-cli-test-" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return d;
}

Run run(const std::string& args) {
    const auto log = workdir() / "stdout.txt";
    const std::string cmd = std::string(TNSVD_CLI) + " " + args + " > " + log.string() + " 2> " +
                            (workdir() / "stderr.txt").string();
    const int st = std::system(cmd.c_str());
    std::ifstream f(log);
    std::stringstream ss;
    ss << f.rdbuf();
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, ss.str()};
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

void write(const std::string& name, const std::string& text) { std::ofstream(path(name)) << text; }

std::string slurp(const std::string& name) {
    std::ifstream f(path(name));
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("cli: svd of an identity chain") {
    write("id.bdp", "bdp 1\nfactor 1 lower 3 3\n");
    const auto r = run("svd " + path("id.bdp"));
    CHECK(r.code == 0);
    CHECK(r.out.find("# rank 3") != std::string::npos);
    CHECK(r.out.find("1\t1.000000000000000e+00") != std::string::npos);
    CHECK(r.out.find("3\t1.000000000000000e+00") != std::string::npos);
}

TEST_CASE("cli: gen, assemble, extract, deflate, svd, verify") {
    CHECK(run("gen cauchy --x 1,2 --y 1,2 -o " + path("c.bdp")).code == 0);
    CHECK(run("assemble " + path("c.bdp") + " -o " + path("c.bdr")).code == 0);
    const auto bdr = slurp("c.bdr");
    CHECK(bdr.rfind("bdr 1 2 2", 0) == 0);
    CHECK(run("extract " + path("c.bdr") + " --drop-rows 1 -o " + path("s.bdr")).code == 0);
    CHECK(slurp("s.bdr").rfind("bdr 1 1 2", 0) == 0);

    CHECK(run("gen vandermonde --x 1,2 --row-counts 2,1 --cols 3 -o " + path("v.bdp")).code == 0);
    const auto d = run("deflate --accumulate " + path("v.bdp"));
    CHECK(d.code == 0);
    CHECK(d.out.find("\"rank\":2") != std::string::npos);
    CHECK(d.out.find("\"side\":\"left\"") != std::string::npos);
    const auto s = run("svd --oracle " + path("v.bdp"));
    CHECK(s.code == 0);
    CHECK(s.out.find("# zeros 1") != std::string::npos);
    CHECK(run("verify --oracle " + path("v.bdp")).code == 0);
}

TEST_CASE("cli: output is deterministic") {
    CHECK(run("gen example4 --seed 5 -o " + path("a.bdp")).code == 0);
    CHECK(run("gen example4 --seed 5 -o " + path("b.bdp")).code == 0);
    CHECK(slurp("a.bdp") == slurp("b.bdp"));
    CHECK(run("svd " + path("a.bdp") + " -o " + path("a.tsv")).code == 0);
    CHECK(run("svd " + path("b.bdp") + " -o " + path("b.tsv")).code == 0);
    CHECK(slurp("a.tsv") == slurp("b.tsv"));
}

TEST_CASE("cli: exit codes") {
    CHECK(run("").code == 2);
    CHECK(run("nonsense").code == 2);
    write("bad.bdp", "bdp 1\nfactor 1 lower 2 2\npair 1 zebra 1\n");
    CHECK(run("svd " + path("bad.bdp")).code == 2);
    write("neg.bdp", "bdp 1\nfactor 1 lower 2 2\npair 1 -1 1\n");
    CHECK(run("svd " + path("neg.bdp")).code == 3);
    CHECK(run("svd " + path("missing.bdp")).code != 0);
    CHECK(run("gen example9").code != 0);
}
