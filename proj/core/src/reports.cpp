namespace orlicz {
}
