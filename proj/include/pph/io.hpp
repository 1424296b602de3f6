#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pph/bitvec.hpp"
#include "pph/embedding.hpp"

namespace pph {

inline constexpr int kSchemaVersion = 1;

// Shortest exact decimal form of a double; round-trips bit-exactly.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

// ---- PublicParams <-> JSON ----

inline nlohmann::json params_to_json(const PublicParams& params) {
    nlohmann::json maps = nlohmann::json::array();
    for (std::size_t i = 0; i < params.n; ++i) {
        nlohmann::json h0 = nlohmann::json::array();
        nlohmann::json h1 = nlohmann::json::array();
        for (std::size_t j = 0; j < params.r; ++j) {
            h0.push_back(params.zero_map(i)[j]);
            h1.push_back(params.one_map(i)[j]);
        }
        maps.push_back(nlohmann::json::array({h0, h1}));
    }
    return nlohmann::json{{"schema_version", kSchemaVersion},
                          {"params_id", params.id()},
                          {"n", params.n},
                          {"m", params.m},
                          {"r", params.r},
                          {"seed", params.seed},
                          {"rho", params.rho},
                          {"alpha", params.alpha},
                          {"alpha_source", to_string(params.alpha_source)},
                          {"maps", maps}};
}

inline PublicParams params_from_json(const nlohmann::json& j) {
    PublicParams params;
    try {
        params.n = j.at("n").get<std::size_t>();
        params.m = j.at("m").get<std::size_t>();
        params.r = j.at("r").get<std::size_t>();
        params.seed = j.at("seed").get<std::uint64_t>();
        params.rho = j.at("rho").get<double>();
        params.alpha = j.at("alpha").get<double>();
        const auto source = j.at("alpha_source").get<std::string>();
        if (source == "analytic") {
            params.alpha_source = AlphaSource::Analytic;
        } else if (source == "calibrated") {
            params.alpha_source = AlphaSource::Calibrated;
        } else {
            throw std::runtime_error("params: unknown alpha_source '" + source + "'");
        }
        const auto& maps = j.at("maps");
        if (maps.size() != params.n) throw std::runtime_error("params: maps size != n");
        params.maps.resize(2 * params.r * params.n);
        for (std::size_t i = 0; i < params.n; ++i) {
            const auto& pair = maps.at(i);
            if (pair.size() != 2 || pair.at(0).size() != params.r || pair.at(1).size() != params.r) {
                throw std::runtime_error("params: malformed maps entry at coordinate " +
                                         std::to_string(i));
            }
            for (std::size_t side = 0; side < 2; ++side) {
                for (std::size_t k = 0; k < params.r; ++k) {
                    const auto idx = pair.at(side).at(k).get<std::uint64_t>();
                    if (idx >= params.m) {
                        throw std::runtime_error("params: map index out of range at coordinate " +
                                                 std::to_string(i));
                    }
                    params.maps[2 * params.r * i + side * params.r + k] =
                        static_cast<std::uint32_t>(idx);
                }
            }
            for (std::size_t a = 0; a < params.r; ++a) {
                for (std::size_t b = 0; b < params.r; ++b) {
                    if (params.zero_map(i)[a] == params.one_map(i)[b]) {
                        throw std::runtime_error(
                            "params: zero/one maps overlap at coordinate " + std::to_string(i));
                    }
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("params: malformed JSON: ") + e.what());
    }
    return params;
}

inline void save_params(const std::string& path, const PublicParams& params) {
    write_text_file(path, params_to_json(params).dump(2) + "\n");
}

inline PublicParams load_params(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("params file " + path + ": " + e.what());
    }
    return params_from_json(j);
}

// ---- HashOutput files ----

inline nlohmann::json hash_to_json(const HashOutput& h) {
    return nlohmann::json{{"params_id", h.params_id},
                          {"m", h.bits.size()},
                          {"hex_bits", h.bits.to_hex()}};
}

inline HashOutput hash_from_json(const nlohmann::json& j) {
    HashOutput h;
    try {
        h.params_id = j.at("params_id").get<std::string>();
        const auto m = j.at("m").get<std::size_t>();
        h.bits = BitVector::from_hex(m, j.at("hex_bits").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("hash entry: malformed JSON: ") + e.what());
    }
    return h;
}

inline void save_hashes(const std::string& path, const std::vector<HashOutput>& hashes) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& h : hashes) arr.push_back(hash_to_json(h));
    nlohmann::json j{{"schema_version", kSchemaVersion}, {"hashes", arr}};
    write_text_file(path, j.dump(2) + "\n");
}

inline std::vector<HashOutput> load_hashes(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("hash file " + path + ": " + e.what());
    }
    std::vector<HashOutput> hashes;
    if (!j.contains("hashes")) throw std::runtime_error("hash file " + path + ": missing 'hashes'");
    for (const auto& entry : j.at("hashes")) hashes.push_back(hash_from_json(entry));
    return hashes;
}

// ---- Input vector files: one "<bit length>:<hex>" per line ----

inline std::vector<BitVector> load_vectors(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::vector<BitVector> vectors;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected '<length>:<hex>'");
        }
        std::size_t length = 0;
        try {
            length = std::stoull(line.substr(0, colon));
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": invalid bit length field");
        }
        try {
            vectors.push_back(BitVector::from_hex(length, line.substr(colon + 1)));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (vectors.empty()) throw std::runtime_error(path + ": no vectors found");
    return vectors;
}

inline void save_vectors(const std::string& path, const std::vector<BitVector>& vectors) {
    std::string out;
    for (const auto& v : vectors) {
        out += std::to_string(v.size());
        out += ':';
        out += v.to_hex();
        out += '\n';
    }
    write_text_file(path, out);
}

// ---- CSV ----

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_string() const {
        std::string out = join(header);
        for (const auto& row : rows) {
            if (row.size() != header.size()) {
                throw std::runtime_error("CSV row width does not match header");
            }
            out += join(row);
        }
        return out;
    }

    static CsvTable parse(const std::string& text) {
        CsvTable table;
        std::istringstream in(text);
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::vector<std::string> fields;
            std::size_t start = 0;
            while (true) {
                const auto comma = line.find(',', start);
                if (comma == std::string::npos) {
                    fields.push_back(line.substr(start));
                    break;
                }
                fields.push_back(line.substr(start, comma - start));
                start = comma + 1;
            }
            if (first) {
                table.header = std::move(fields);
                first = false;
            } else {
                table.rows.push_back(std::move(fields));
            }
        }
        return table;
    }

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw std::runtime_error("CSV: missing column '" + name + "'");
    }

private:
    static std::string join(const std::vector<std::string>& fields) {
        std::string out;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i > 0) out += ',';
            out += fields[i];
        }
        out += '\n';
        return out;
    }
};

}  // namespace pph
