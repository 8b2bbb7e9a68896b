#include "chaosres/tensor_io.hpp"

#include "chaosres/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace chaosres {

using nlohmann::json;

namespace {

std::size_t positive_int(const json& v, const std::string& what) {
    if (!v.is_number_integer() || v.get<long long>() < 1) throw ParseError(what + " must be a positive integer");
    return static_cast<std::size_t>(v.get<long long>());
}

}  // namespace

CoeffTensor parse_tensor_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON at byte ") + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) throw ParseError("tensor document must be a JSON object");
    if (!doc.contains("dims") || !doc["dims"].is_array() || doc["dims"].empty())
        throw ParseError("\"dims\" must be a nonempty array");

    std::vector<std::size_t> dims;
    for (std::size_t p = 0; p < doc["dims"].size(); ++p)
        dims.push_back(positive_int(doc["dims"][p], "dims[" + std::to_string(p) + "]"));
    if (doc.contains("degree") && positive_int(doc["degree"], "\"degree\"") != dims.size())
        throw ParseError("\"degree\" does not match the length of \"dims\"");

    const bool has_entries = doc.contains("entries");
    const bool has_dense = doc.contains("dense");
    if (has_entries == has_dense) throw ParseError("exactly one of \"entries\" or \"dense\" is required");

    try {
        if (has_dense) {
            const auto& arr = doc["dense"];
            if (!arr.is_array()) throw ParseError("\"dense\" must be an array");
            std::vector<double> values;
            values.reserve(arr.size());
            for (std::size_t k = 0; k < arr.size(); ++k) {
                if (!arr[k].is_number()) throw ParseError("dense[" + std::to_string(k) + "] is not a number");
                values.push_back(arr[k].get<double>());
            }
            return CoeffTensor::from_dense(dims, values, dims.size() <= 3 ? Storage::dense : Storage::sparse);
        }
        const auto& arr = doc["entries"];
        if (!arr.is_array()) throw ParseError("\"entries\" must be an array");
        std::vector<Entry> entries;
        entries.reserve(arr.size());
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const auto& item = arr[k];
            const std::string where = "entries[" + std::to_string(k) + "]";
            if (!item.is_object() || !item.contains("idx") || !item.contains("val"))
                throw ParseError(where + " needs \"idx\" and \"val\"");
            if (!item["val"].is_number()) throw ParseError(where + ".val is not a number");
            const auto& idx = item["idx"];
            if (!idx.is_array() || idx.size() != dims.size())
                throw ParseError(where + ".idx must hold " + std::to_string(dims.size()) + " indices");
            Entry e;
            for (std::size_t p = 0; p < dims.size(); ++p) {
                const auto i = positive_int(idx[p], where + ".idx[" + std::to_string(p) + "]");
                if (i > dims[p])
                    throw ParseError(where + ".idx[" + std::to_string(p) + "] = " + std::to_string(i) +
                                     " exceeds dim " + std::to_string(dims[p]));
                e.idx.push_back(i - 1);
            }
            e.val = item["val"].get<double>();
            entries.push_back(std::move(e));
        }
        return CoeffTensor::from_entries(dims, entries);
    } catch (const DomainError& e) {
        throw ParseError(e.what());
    }
}

CoeffTensor read_tensor_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open tensor file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_tensor_json(buf.str());
}

std::string tensor_to_json(const CoeffTensor& f) {
    json doc;
    doc["degree"] = f.degree();
    doc["dims"] = f.dims();
    json entries = json::array();
    for (std::size_t e = 0; e < f.nnz(); ++e) {
        json idx = json::array();
        for (auto i : f.index(e)) idx.push_back(i + 1);
        entries.push_back({{"idx", idx}, {"val", f.value(e)}});
    }
    doc["entries"] = std::move(entries);
    return doc.dump();
}

void write_tensor_file(const CoeffTensor& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write tensor file " + path);
    out << tensor_to_json(f) << '\n';
}

}  // namespace chaosres
