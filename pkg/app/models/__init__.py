# 물리 모델 패키지
