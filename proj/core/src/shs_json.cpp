#include "aoi/shs_json.hpp"

#include "aoi/errors.hpp"

#include <json.hpp>

namespace aoi {

using nlohmann::json;

std::string model_to_json(const ShsModel& model, int indent) {
    json doc;
    doc["num_states"] = model.num_states();
    doc["num_components"] = model.num_components();
    doc["slopes"] = model.slopes();
    json transitions = json::array();
    for (const auto& t : model.transitions()) {
        transitions.push_back({{"from", t.from_state},
                               {"to", t.to_state},
                               {"rate", t.rate},
                               {"reset_map", t.reset.dense()}});
    }
    doc["transitions"] = std::move(transitions);
    return doc.dump(indent);
}

ShsModel model_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ModelError(std::string("model JSON: ") + e.what());
    }

    try {
        const auto num_states = doc.at("num_states").get<std::size_t>();
        const auto num_components = doc.at("num_components").get<std::size_t>();
        auto slopes = doc.at("slopes").get<std::vector<std::vector<int>>>();
        std::vector<TransitionSpec> transitions;
        for (const auto& entry : doc.at("transitions")) {
            TransitionSpec spec;
            spec.from_state = entry.at("from").get<std::size_t>();
            spec.to_state = entry.at("to").get<std::size_t>();
            spec.rate = entry.at("rate").get<double>();
            spec.reset_map = entry.at("reset_map").get<DenseMatrix>();
            transitions.push_back(std::move(spec));
        }
        return build_model(num_states, num_components, std::move(transitions), std::move(slopes));
    } catch (const json::exception& e) {
        throw ModelError(std::string("model JSON: ") + e.what());
    }
}

}  // namespace aoi
