#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "interfuse/core/error.hpp"
#include "interfuse/ingest/vectors.hpp"

namespace interfuse::visual {

/// Local descriptors of one image, stored row-major.
class DescriptorSet {
public:
    DescriptorSet(std::string image_id, std::size_t dim) : image_id_(std::move(image_id)), dim_(dim) {
        if (dim_ == 0) throw ValidationError("descriptor dimension must be positive");
    }

    void add(std::span<const float> descriptor) {
        if (descriptor.size() != dim_) {
            throw ValidationError("descriptor of dim " + std::to_string(descriptor.size()) + " added to image '" +
                                  image_id_ + "' with dim " + std::to_string(dim_));
        }
        for (float x : descriptor) {
            if (!std::isfinite(x)) throw ValidationError("non-finite descriptor component in image '" + image_id_ + "'");
        }
        data_.insert(data_.end(), descriptor.begin(), descriptor.end());
    }

    [[nodiscard]] const std::string& image_id() const { return image_id_; }
    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] std::size_t size() const { return data_.size() / dim_; }
    [[nodiscard]] bool empty() const { return data_.empty(); }
    [[nodiscard]] std::span<const float> row(std::size_t i) const {
        return std::span<const float>(data_).subspan(i * dim_, dim_);
    }

private:
    std::string image_id_;
    std::size_t dim_;
    std::vector<float> data_;
};

/// Builds one DescriptorSet per distinct id of a descriptor container file, in
/// first-appearance order.
inline std::vector<DescriptorSet> descriptor_sets(const std::vector<ingest::DenseVector>& vectors) {
    const std::size_t dim = ingest::common_dim(vectors);
    std::vector<DescriptorSet> out;
    for (const auto& [id, rows] : ingest::group_by_id(vectors)) {
        DescriptorSet s(id, dim);
        for (const auto& r : rows) s.add(r);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace interfuse::visual
