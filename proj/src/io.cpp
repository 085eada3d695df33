#include "henonlab/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace henonlab {

using nlohmann::json;

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(const std::string& s) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(s)));
    return buf;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string unimodal_to_json(const UnimodalMap& f) {
    json j;
    j["basis"] = "chebyshev";
    j["domain"] = {f.fn.lo(), f.fn.hi()};
    j["coefficients"] = f.fn.coef();
    j["critical_point"] = f.c0;
    j["c1"] = f.c1;
    j["c2"] = f.c2;
    return j.dump(2);
}

UnimodalMap unimodal_from_json(const std::string& text) {
    json j = json::parse(text);
    std::vector<double> coef = j.at("coefficients").get<std::vector<double>>();
    const double lo = j.at("domain")[0].get<double>();
    const double hi = j.at("domain")[1].get<double>();
    return make_unimodal(Cheb1D(std::move(coef), lo, hi));
}

std::string tower_manifest_json(const RenormTower& tower, const std::string& config_hash) {
    json j;
    j["schema"] = "henonlab.tower.v1";
    j["config_hash"] = config_hash;
    j["depth"] = tower.depth();
    json levels = json::array();
    for (int n = 0; n < tower.depth(); ++n) {
        const HenonLikeMap& F = tower.level(n);
        json lv;
        lv["level"] = n;
        lv["degenerate"] = F.degenerate;
        lv["eps_bound"] = F.eps_bound;
        lv["f_coefficients"] = F.f.fn.coef();
        if (!F.degenerate) {
            lv["eps_coefficients"] = F.eps.coef();
            lv["eps_shape"] = {F.eps.nx(), F.eps.ny()};
        }
        if (n < static_cast<int>(tower.tips.size())) {
            lv["tip"] = {tower.tips[static_cast<size_t>(n)].x, tower.tips[static_cast<size_t>(n)].y};
        }
        levels.push_back(lv);
    }
    j["levels"] = levels;
    return j.dump();
}

std::string cover_to_json(const Cover& cover, const std::string& config_hash) {
    json j;
    j["schema"] = "henonlab.cover.v1";
    j["config_hash"] = config_hash;
    j["regime"] = cover.regime == Regime::Overlapping ? "overlapping" : "disjoint";
    j["T_measure"] = cover.T_measure;
    j["config"] = {{"A0", cover.cfg.A0}, {"A1", cover.cfg.A1}, {"sigma", cover.cfg.sigma},
                   {"p", cover.cfg.p},   {"b1", cover.cfg.b1}, {"b0", cover.cfg.b0}};
    json stages = json::array();
    for (const auto& st : cover.stages) {
        json s;
        s["edge_remnant"] = st.edge_remnant;
        json refs = json::array();
        for (const auto& r : st.refinements) {
            json rr;
            rr["m"] = r.m;
            rr["delta"] = r.delta;
            rr["uncovered_before"] = r.uncovered_before;
            rr["uncovered_after"] = r.uncovered_after;
            rr["covered_added"] = r.covered_added;
            rr["max_gap_length"] = r.max_gap_length;
            rr["placed_count"] = r.placed.size();
            json iv = json::array();
            const size_t keep = std::min<size_t>(r.placed.size(), 4096);
            for (size_t i = 0; i < keep; ++i)
                iv.push_back({r.placed[i].d, r.placed[i].m, r.placed[i].lo(), r.placed[i].hi()});
            rr["intervals"] = iv;
            refs.push_back(rr);
        }
        s["refinements"] = refs;
        stages.push_back(s);
    }
    j["stages"] = stages;
    return j.dump();
}

CsvWriter::CsvWriter(const std::string& path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    out_ = std::fopen(path.c_str(), "w");
    if (!out_) throw Error("CsvWriter: cannot open " + path);
}

CsvWriter::~CsvWriter() {
    if (out_) std::fclose(static_cast<FILE*>(out_));
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    FILE* f = static_cast<FILE*>(out_);
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) std::fputc(',', f);
        std::fputs(cells[i].c_str(), f);
    }
    std::fputc('\n', f);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("write_text_file: cannot open " + path);
    out << text;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("read_text_file: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_coeff_blob(const std::string& dir, const std::string& key,
                      const std::vector<double>& data) {
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/" + key + ".bin";
    std::ofstream out(path, std::ios::binary);
    const std::uint64_t n = data.size();
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(n * sizeof(double)));
}

bool read_coeff_blob(const std::string& dir, const std::string& key, std::vector<double>& data) {
    const std::string path = dir + "/" + key + ".bin";
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    if (!in || n > (1ull << 30)) return false;
    data.resize(n);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(n * sizeof(double)));
    return static_cast<bool>(in);
}

}  // namespace henonlab
