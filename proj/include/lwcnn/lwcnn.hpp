#pragma once

#include "lwcnn/bench.hpp"
#include "lwcnn/cost.hpp"
#include "lwcnn/crc32.hpp"
#include "lwcnn/error.hpp"
#include "lwcnn/forward.hpp"
#include "lwcnn/graph.hpp"
#include "lwcnn/graph_text.hpp"
#include "lwcnn/image_io.hpp"
#include "lwcnn/model_format.hpp"
#include "lwcnn/ops.hpp"
#include "lwcnn/preprocess.hpp"
#include "lwcnn/tensor.hpp"
