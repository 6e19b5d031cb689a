/*
 * Copyright 2026 The PASTA Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* Compiles the public header as C and drives a few calls through it. */

#include "pasta/pasta.h"

#include <stdio.h>

int main(void) {
  const float data[4] = {0.0f, 1.0f, 2.0f, 3.0f};
  const uint16_t labels[4] = {0, 1, 2, 0};
  pasta_grid* grid = NULL;
  pasta_raster* raster = NULL;
  pasta_iou iou;
  uint32_t rows = 0, cols = 0, dim = 0;

  if (pasta_grid_create(2, 2, 1, data, &grid) != PASTA_OK) return 1;
  pasta_grid_shape(grid, &rows, &cols, &dim);
  if (rows != 2 || cols != 2 || dim != 1) return 1;
  pasta_grid_free(grid);

  if (pasta_raster_create(2, 2, PASTA_RASTER_TRI_CLASS, labels, &raster) != PASTA_OK) return 1;
  if (pasta_eval_rasters(raster, raster, PASTA_EVAL_FUSED, &iou) != PASTA_OK) return 1;
  pasta_raster_free(raster);
  if (iou.miou != 100.0) return 1;

  if (pasta_grid_read(NULL, &grid) != PASTA_ERR_INVALID_ARGUMENT) return 1;
  printf("pasta %s ok\n", pasta_version());
  return 0;
}
