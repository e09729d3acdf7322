#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "dyadica/estimate.hpp"
#include "dyadica/kernel.hpp"
#include "dyadica/measure.hpp"

namespace dyadica {

using json = nlohmann::json;

// ---- measure files -------------------------------------------------------

inline json measure_to_json(const AtomicMeasure& mu) {
    json j;
    j["n"] = mu.grid().n;
    j["depth"] = mu.grid().L;
    json atoms = json::array();
    for (const auto& a : mu.atoms()) {
        json e;
        e["x"] = std::vector<double>(a.x.begin(), a.x.begin() + mu.grid().n);
        e["m"] = a.m;
        atoms.push_back(e);
    }
    j["atoms"] = atoms;
    return j;
}

/// Accepts either an explicit atom list or a generator family description.
inline AtomicMeasure measure_from_json(const json& j) {
    if (j.contains("family")) {
        std::string fam = j.at("family").get<std::string>();
        int depth = j.at("depth").get<int>();
        int n = j.value("n", 1);
        int L = j.value("L", depth);
        GridSpec g{n, L};
        if (fam == "uniform") return generate_uniform(g, depth);
        if (fam == "cascade")
            return generate_cascade(g, j.at("beta").get<double>(), depth,
                                    j.at("seed").get<std::uint64_t>());
        if (fam == "power") return generate_power(g, j.at("a").get<double>(), depth);
        if (fam == "appendix_sigma" || fam == "appendix_omega")
            return generate_appendix(g,
                                     fam == "appendix_sigma" ? DensityMeasure::Family::AppendixSigma
                                                             : DensityMeasure::Family::AppendixOmega,
                                     j.at("p").get<double>(), j.at("alpha").get<double>(), depth);
        throw std::invalid_argument("measure file: unknown family '" + fam + "'");
    }
    int n = j.at("n").get<int>();
    int L = j.at("depth").get<int>();
    std::vector<Atom> atoms;
    for (const auto& e : j.at("atoms")) {
        Atom a;
        auto xs = e.at("x").get<std::vector<double>>();
        if (int(xs.size()) != n) throw std::invalid_argument("measure file: atom dimension mismatch");
        for (int k = 0; k < n; ++k) a.x[std::size_t(k)] = xs[std::size_t(k)];
        a.m = e.at("m").get<double>();
        atoms.push_back(a);
    }
    return AtomicMeasure(GridSpec{n, L}, std::move(atoms));
}

// ---- kernel files --------------------------------------------------------

inline json kernel_to_json(const KernelSpec& k) {
    json j;
    switch (k.family) {
        case KernelSpec::Family::Hilbert: j["family"] = "hilbert"; break;
        case KernelSpec::Family::SignedFractional: j["family"] = "signed_fractional"; break;
        case KernelSpec::Family::RieszType: j["family"] = "riesz"; break;
    }
    j["n"] = k.n;
    j["lambda"] = k.lambda;
    j["delta"] = k.delta;
    j["R"] = k.R;
    if (k.family == KernelSpec::Family::RieszType) j["component"] = k.component;
    return j;
}

inline KernelSpec kernel_from_json(const json& j) {
    KernelSpec k;
    std::string fam = j.at("family").get<std::string>();
    if (fam == "hilbert")
        k.family = KernelSpec::Family::Hilbert;
    else if (fam == "signed_fractional")
        k.family = KernelSpec::Family::SignedFractional;
    else if (fam == "riesz")
        k.family = KernelSpec::Family::RieszType;
    else
        throw std::invalid_argument("kernel file: unknown family '" + fam + "'");
    k.n = j.value("n", 1);
    k.lambda = j.at("lambda").get<double>();
    k.delta = j.at("delta").get<double>();
    k.R = j.at("R").get<double>();
    k.component = j.value("component", 0);
    k.validate();
    return k;
}

// ---- constants CSV -------------------------------------------------------

inline std::string estimate_csv_header() { return "name,value,kind,family,witness,seed"; }

inline std::string estimate_csv_row(const ConstantEstimate& e) {
    std::ostringstream os;
    os.precision(17);
    std::ostringstream wit;
    for (std::size_t i = 0; i < e.witness_cubes.size(); ++i) {
        if (i) wit << ' ';
        wit << format_cube(e.witness_cubes[i], 3);
    }
    os << e.name << ',' << e.value << ',' << e.kind_str() << ",\"" << e.family << "\",\""
       << wit.str() << "\"," << e.seed;
    return os.str();
}

// ---- content hashing -----------------------------------------------------

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

/// Hash of the canonical dump with the timestamp field removed; reports embed
/// this so identical configs produce identical hashes across runs.
inline std::uint64_t report_hash(json j) {
    j.erase("timestamp");
    j.erase("content_hash");
    return fnv1a(j.dump());
}

inline void finalize_report(json& j, const std::string& timestamp) {
    j["timestamp"] = timestamp;
    std::ostringstream os;
    os << std::hex << report_hash(j);
    j["content_hash"] = os.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace dyadica
