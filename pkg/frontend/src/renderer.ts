/**
 * WebGL2 renderer: draws the layer spheres back to front with straight-alpha
 * blending over a black background.  One shared unit-sphere mesh is scaled
 * per layer by its radius.
 */

import { Camera } from "./camera.js";
import { Vec3, lookAlong, matMul, perspective } from "./math.js";
import { LayerMask, SphereMesh, buildSphereMesh, drawOrder } from "./scene.js";

const VERT = `#version 300 es
in vec3 a_position;
in vec2 a_uv;
uniform mat4 u_viewProj;
uniform float u_radius;
out vec2 v_uv;
void main() {
  v_uv = a_uv;
  gl_Position = u_viewProj * vec4(u_radius * a_position, 1.0);
}
`;

const FRAG = `#version 300 es
precision highp float;
in vec2 v_uv;
uniform sampler2D u_layer;
out vec4 outColor;
void main() {
  outColor = texture(u_layer, v_uv);
}
`;

function compile(gl: WebGL2RenderingContext, type: number, src: string): WebGLShader {
  const sh = gl.createShader(type)!;
  gl.shaderSource(sh, src);
  gl.compileShader(sh);
  if (!gl.getShaderParameter(sh, gl.COMPILE_STATUS)) {
    throw new Error(`shader compile failed: ${gl.getShaderInfoLog(sh)}`);
  }
  return sh;
}

export class MsiRenderer {
  private program: WebGLProgram;
  private vao: WebGLVertexArrayObject;
  private mesh: SphereMesh;
  private textures: WebGLTexture[] = [];
  private radii: number[] = [];
  private uViewProj: WebGLUniformLocation;
  private uRadius: WebGLUniformLocation;

  constructor(private gl: WebGL2RenderingContext) {
    const program = gl.createProgram()!;
    gl.attachShader(program, compile(gl, gl.VERTEX_SHADER, VERT));
    gl.attachShader(program, compile(gl, gl.FRAGMENT_SHADER, FRAG));
    gl.linkProgram(program);
    if (!gl.getProgramParameter(program, gl.LINK_STATUS)) {
      throw new Error(`program link failed: ${gl.getProgramInfoLog(program)}`);
    }
    this.program = program;
    this.uViewProj = gl.getUniformLocation(program, "u_viewProj")!;
    this.uRadius = gl.getUniformLocation(program, "u_radius")!;

    this.mesh = buildSphereMesh();
    this.vao = gl.createVertexArray()!;
    gl.bindVertexArray(this.vao);
    const posLoc = gl.getAttribLocation(program, "a_position");
    const uvLoc = gl.getAttribLocation(program, "a_uv");
    const posBuf = gl.createBuffer();
    gl.bindBuffer(gl.ARRAY_BUFFER, posBuf);
    gl.bufferData(gl.ARRAY_BUFFER, this.mesh.positions, gl.STATIC_DRAW);
    gl.enableVertexAttribArray(posLoc);
    gl.vertexAttribPointer(posLoc, 3, gl.FLOAT, false, 0, 0);
    const uvBuf = gl.createBuffer();
    gl.bindBuffer(gl.ARRAY_BUFFER, uvBuf);
    gl.bufferData(gl.ARRAY_BUFFER, this.mesh.uvs, gl.STATIC_DRAW);
    gl.enableVertexAttribArray(uvLoc);
    gl.vertexAttribPointer(uvLoc, 2, gl.FLOAT, false, 0, 0);
    const idxBuf = gl.createBuffer();
    gl.bindBuffer(gl.ELEMENT_ARRAY_BUFFER, idxBuf);
    gl.bufferData(gl.ELEMENT_ARRAY_BUFFER, this.mesh.indices, gl.STATIC_DRAW);
    gl.bindVertexArray(null);
  }

  /** Upload layer images as bilinear textures; PNGs hold straight alpha. */
  setLayers(images: TexImageSource[], radii: number[]): void {
    const gl = this.gl;
    for (const t of this.textures) gl.deleteTexture(t);
    this.textures = images.map((img) => {
      const tex = gl.createTexture()!;
      gl.bindTexture(gl.TEXTURE_2D, tex);
      // Straight (non-premultiplied) alpha, top image row at v=0.
      gl.pixelStorei(gl.UNPACK_PREMULTIPLY_ALPHA_WEBGL, false);
      gl.pixelStorei(gl.UNPACK_FLIP_Y_WEBGL, false);
      gl.texImage2D(gl.TEXTURE_2D, 0, gl.RGBA, gl.RGBA, gl.UNSIGNED_BYTE, img);
      gl.texParameteri(gl.TEXTURE_2D, gl.TEXTURE_MIN_FILTER, gl.LINEAR);
      gl.texParameteri(gl.TEXTURE_2D, gl.TEXTURE_MAG_FILTER, gl.LINEAR);
      // Horizontal wrap; the duplicated seam column keeps interpolation
      // continuous across azimuth +-180 degrees.
      gl.texParameteri(gl.TEXTURE_2D, gl.TEXTURE_WRAP_S, gl.REPEAT);
      gl.texParameteri(gl.TEXTURE_2D, gl.TEXTURE_WRAP_T, gl.CLAMP_TO_EDGE);
      return tex;
    });
    this.radii = radii.slice();
  }

  get layerCount(): number {
    return this.textures.length;
  }

  render(camera: Camera, mask?: LayerMask): void {
    const gl = this.gl;
    const w = gl.drawingBufferWidth;
    const h = gl.drawingBufferHeight;
    gl.viewport(0, 0, w, h);
    gl.clearColor(0, 0, 0, 1);
    gl.clear(gl.COLOR_BUFFER_BIT);
    if (this.textures.length === 0) return;

    const proj = perspective(
      (camera.fovDeg * Math.PI) / 180,
      w / h,
      0.01 * this.radii[0],
      4 * this.radii[this.radii.length - 1],
    );
    const view = lookAlong(camera.position as Vec3, camera.forward());
    const viewProj = matMul(proj, view);

    gl.disable(gl.DEPTH_TEST);
    gl.enable(gl.BLEND);
    gl.blendFuncSeparate(
      gl.SRC_ALPHA,
      gl.ONE_MINUS_SRC_ALPHA,
      gl.ONE,
      gl.ONE_MINUS_SRC_ALPHA,
    );
    gl.useProgram(this.program);
    gl.bindVertexArray(this.vao);
    gl.uniformMatrix4fv(this.uViewProj, false, viewProj);
    gl.activeTexture(gl.TEXTURE0);

    const order = mask ? mask.visibleDrawOrder(this.radii) : drawOrder(this.radii);
    for (const i of order) {
      gl.uniform1f(this.uRadius, this.radii[i]);
      gl.bindTexture(gl.TEXTURE_2D, this.textures[i]);
      gl.drawElements(gl.TRIANGLES, this.mesh.indices.length, gl.UNSIGNED_INT, 0);
    }
    gl.bindVertexArray(null);
  }
}
