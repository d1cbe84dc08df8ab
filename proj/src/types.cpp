#include "leafkit/types.hpp"

#include <set>

#include "leafkit/error.hpp"

namespace leafkit {

RgbImage::RgbImage(int height, int width) {
  for (auto& c : channels) c = Channel::Zero(height, width);
}

std::int64_t count_set(const Mask& mask) {
  return (mask.array() != 0).count();
}

std::int64_t InstanceMask::area() const { return count_set(grid); }

BoundingBox tight_bbox(const Mask& mask) {
  BoundingBox box{int(mask.cols()), int(mask.rows()), -1, -1};
  for (Eigen::Index y = 0; y < mask.rows(); ++y) {
    for (Eigen::Index x = 0; x < mask.cols(); ++x) {
      if (!mask(y, x)) continue;
      box.x_min = std::min(box.x_min, int(x));
      box.y_min = std::min(box.y_min, int(y));
      box.x_max = std::max(box.x_max, int(x));
      box.y_max = std::max(box.y_max, int(y));
    }
  }
  if (box.x_max < 0) throw ValidationError("mask has no set pixels");
  return box;
}

InstanceMask make_instance(std::int64_t id, std::int64_t image_id, Mask grid,
                           std::optional<double> score) {
  InstanceMask inst;
  inst.id = id;
  inst.image_id = image_id;
  inst.bbox = tight_bbox(grid);
  inst.grid = std::move(grid);
  inst.score = score;
  return inst;
}

const ImageRef* Dataset::find_image(std::int64_t id) const {
  for (const auto& im : images)
    if (im.id == id) return &im;
  return nullptr;
}

std::vector<const InstanceMask*> Dataset::instances_of(std::int64_t image_id) const {
  std::vector<const InstanceMask*> out;
  for (const auto& inst : instances)
    if (inst.image_id == image_id) out.push_back(&inst);
  return out;
}

void Dataset::validate() const {
  std::set<std::int64_t> image_ids;
  for (const auto& im : images) {
    if (im.width <= 0 || im.height <= 0)
      throw ValidationError("image " + std::to_string(im.id) + " has non-positive size");
    if (!image_ids.insert(im.id).second)
      throw ValidationError("duplicate image id " + std::to_string(im.id));
  }
  std::set<std::int64_t> instance_ids;
  for (const auto& inst : instances) {
    if (!instance_ids.insert(inst.id).second)
      throw ValidationError("duplicate instance id " + std::to_string(inst.id));
    const ImageRef* im = find_image(inst.image_id);
    if (!im)
      throw ValidationError("instance " + std::to_string(inst.id) + " references missing image " +
                            std::to_string(inst.image_id));
    if (inst.grid.rows() != im->height || inst.grid.cols() != im->width)
      throw ValidationError("instance " + std::to_string(inst.id) +
                            " grid does not match its image size");
    if (inst.score && (*inst.score < 0.0 || *inst.score > 1.0))
      throw ValidationError("instance " + std::to_string(inst.id) + " score outside [0, 1]");
  }
}

}  // namespace leafkit
